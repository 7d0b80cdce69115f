"""Integration tests for spinaddress package"""
