# Test package for netbell
