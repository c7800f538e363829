"""Random streams and CUE sampling"""
