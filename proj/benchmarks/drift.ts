; x drifts by y each step; safe, but the update is not constant-offset
vars: x y
init: (and (= x 0) (= y 1))
rel: (and (= x' (+ x y)) (= y' y))
err: (< x 0)
