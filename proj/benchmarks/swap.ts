; the pair (x, y) alternates; the sum is the learnable invariant
vars: x y
init: (and (= x 0) (= y 1))
rel: (and (= x' y) (= y' x))
err: (>= x 2)
