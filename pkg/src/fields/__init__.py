"""Gaussian reference field"""
