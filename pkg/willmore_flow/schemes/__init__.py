# Time Stepping Module