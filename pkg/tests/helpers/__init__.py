# Test helpers package.
