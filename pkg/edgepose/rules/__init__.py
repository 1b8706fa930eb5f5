"""Acceptance rules"""
