# Hardedge: inverse spectral moments of the beta-Laguerre ensemble
