# Domain models and output schemas
