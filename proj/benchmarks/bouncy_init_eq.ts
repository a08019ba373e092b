; bouncy with the weaker initial condition x = y
vars: w x y
init: (= x y)
rel: (or (and (= w 0) (= x' (+ x 1)) (= y' (+ y 1)))
         (and (= w' w) (= w 1) (= x' (- x 1)) (= y' (- y 1))))
err: (and (= w 1) (<= x 0) (> y 0))
