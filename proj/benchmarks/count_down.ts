vars: x
init: (= x 100)
rel: (= x' (- x 1))
err: (< x 0)
