# THz multi-UAV downlink simulator
