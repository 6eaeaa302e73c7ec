# Command Line Module