"""Test suite for sgfrwt."""
