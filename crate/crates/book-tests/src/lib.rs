// placeholder until the book chapters land
