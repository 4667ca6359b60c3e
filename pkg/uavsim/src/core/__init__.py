# Network model, channel, constraints, configuration and errors
