# Unit tests for netbell
