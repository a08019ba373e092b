; x stays divisible by four
vars: x
init: (= x 0)
rel: (= x' (+ x 4))
err: (divides 4 (+ x 2))
