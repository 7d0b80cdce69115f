"""
Test suite for spinaddress package
"""
