; diverging counter, unreachable error
vars: x
init: (= x 0)
rel: (= x' (+ x 1))
err: false
