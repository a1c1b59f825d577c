"""Core learning and analysis logic"""
