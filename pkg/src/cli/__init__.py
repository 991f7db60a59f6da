# CLI interface module
