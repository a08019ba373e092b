; gain one or two per step; no constant-offset acceleration exists
vars: x
init: (= x 0)
rel: (and (>= x' (+ x 1)) (<= x' (+ x 2)))
err: (>= x 50)
