"""Fisher-Hartwig symbols, Toeplitz determinants and OPUC"""
