"""Planarity of quadrinomials over F_{q^2}: classification and brute force."""
