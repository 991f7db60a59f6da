# Configuration module
from .logconfig import configure_logging

# Library use stays quiet below WARNING until the CLI or a caller reconfigures
configure_logging()
