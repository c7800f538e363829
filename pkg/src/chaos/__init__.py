"""Multiplicative chaos measures built from CUE fields"""
