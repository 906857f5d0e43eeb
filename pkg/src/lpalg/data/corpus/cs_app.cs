a : p | p -> p
b : (p | p -> p) -> (q | (p | p) -> q | p)
