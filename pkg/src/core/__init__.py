# Spectral computation core
