; drain y, refill from z; the outer loop has no linear transitive closure
vars: x y z
init: (and (<= x 0) (= y 0) (= z 1))
rel: (or (and (> y 0) (= x' (+ x 1)) (= y' (- y 1)) (= z' z))
         (and (= y 0) (= x' x) (= y' z) (= z' z)))
err: (>= x 1000)
