c : bot -> q
