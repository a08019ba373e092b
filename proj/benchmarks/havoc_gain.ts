; nondeterministic gains cannot be accelerated exactly
vars: x
init: (= x 0)
rel: (>= x' (+ x 1))
err: (>= x 50)
