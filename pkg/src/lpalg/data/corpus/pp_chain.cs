a : ((p | p) -> p) -> ((p -> p | p) -> (p -> p))
b : p | p -> p
c : p -> p | p
