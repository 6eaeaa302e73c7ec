# Experiment Harness Module