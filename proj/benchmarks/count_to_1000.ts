; needs 1000 steps concretely, a handful of unrollings with acceleration
vars: x
init: (= x 0)
rel: (= x' (+ x 1))
err: (>= x 1000)
