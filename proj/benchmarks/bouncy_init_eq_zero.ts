; bouncy with init x = y /\ y = 0
vars: w x y
init: (and (= x y) (= y 0))
rel: (or (and (= w 0) (= x' (+ x 1)) (= y' (+ y 1)))
         (and (= w' w) (= w 1) (= x' (- x 1)) (= y' (- y 1))))
err: (and (= w 1) (<= x 0) (> y 0))
