"""Unit tests for spinaddress package"""
