"""netbell: noisy n-local network simulation and variational Bell optimization.

Simulates star and chain quantum networks under source, link and detector
noise, maximizes Bell scores by gradient descent, and checks the results
against closed-form maxima.
"""

__version__ = "0.1.0"
