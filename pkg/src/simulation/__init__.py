"""Motor de simulacion de control compartido con arbitraje por confianza."""
