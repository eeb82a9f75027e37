"""stashkit: hide, boot and trigger a covert Linux sub-system at desk scale."""
__version__ = "1.0.0"
