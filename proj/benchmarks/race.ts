; y grows twice as fast as x
vars: x y
init: (and (= x 0) (= y 0))
rel: (and (= x' (+ x 1)) (= y' (+ y 2)))
err: (> x y)
