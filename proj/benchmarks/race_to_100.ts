vars: x y
init: (and (= x 0) (= y 0))
rel: (and (= x' (+ x 1)) (= y' (+ y 2)))
err: (>= y 100)
