"""Homotopy-analysis solution of the Thomas-Fermi equation with Pade acceleration."""
