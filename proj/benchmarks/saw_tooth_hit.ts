; the reset state itself is reachable
vars: x
init: (= x 0)
rel: (or (and (< x 5) (= x' (+ x 1)))
         (and (= x 5) (= x' 0)))
err: (= x 5)
