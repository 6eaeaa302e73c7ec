# Initial Data Module