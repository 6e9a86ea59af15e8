# Integration tests for netbell
