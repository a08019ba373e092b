; two counters with a coupling guard
vars: x y
init: (and (= x 0) (= y 5))
rel: (and (<= x y) (= x' (+ x 2)) (= y' (+ y 1)))
err: (> x (+ y 1))
