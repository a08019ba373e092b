vars: x
init: (= x 7)
rel: (= x' x)
err: (!= x 7)
