c : p -> p | q
