"""First eigenpair of the coupled fractional (r,s)-p-Laplacian system and its p -> infinity limit."""
