; guarded countdown stops at zero
vars: x
init: (= x 10)
rel: (and (> x 0) (= x' (- x 1)))
err: (= x -1)
