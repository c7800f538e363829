"""Experiment harness, statistics and report export"""
