"""Closed-form asymptotic predictions"""
