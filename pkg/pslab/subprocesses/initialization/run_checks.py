"""Perform initialization checks for a run."""

from pslab.connection import LabConnection
from pslab.exceptions import BusinessError
from pslab.subprocesses.algebra.freealg import NCOrder
from pslab.subprocesses.algebra.presentation import AlgebraPresentation, relation_degrees


class InitializationChecks:
    """
    Class to perform initialization checks on the loaded inputs.
    - Check that characteristic zero is not excluded.
    - Check that cover elements are homogeneous of the swept degree.
    - Check that families have the right number of coordinates.
    - Check that a word order chain names every generator.

    Args:
        connection: The run connection with the presentation loaded.
    """

    def __init__(self, connection: LabConnection) -> None:
        self.connection = connection
        self.config = connection.config
        self.presentation: AlgebraPresentation = connection.presentation

    def check_characteristic(self) -> None:
        """All computations run over QQ."""
        if 0 in self.presentation.char_not:
            raise BusinessError("the presentation excludes characteristic 0, but pslab works over QQ")
        if self.presentation.char_not:
            self.connection.log_trace(f"Characteristic exclusions {list(self.presentation.char_not)} hold over QQ.")

    def check_cover(self) -> None:
        """Cover words must be degree-d expressions in the generators."""
        for expression in self.config.cover:
            polynomial = self.presentation.polynomial(expression)
            if polynomial.is_zero or not polynomial.is_homogeneous or polynomial.degree != self.config.min_deg:
                raise BusinessError(f"cover element '{expression}' is not homogeneous of degree {self.config.min_deg}")

    def check_families(self) -> None:
        """Every family factor lists one coordinate per generator."""
        width = self.presentation.num_generators
        for family in self.connection.families:
            if any(len(factor) != width for factor in family.factors):
                raise BusinessError(f"family {family.label!r} needs {width} coordinates per factor")

    def check_nc_order(self) -> None:
        """The word order chain names every generator once."""
        if self.config.nc_order is not None:
            NCOrder.from_chain(self.presentation, self.config.nc_order)

    def report_relation_degrees(self) -> None:
        degrees = relation_degrees(self.presentation)
        if degrees and degrees[-1] > self.config.max_deg:
            self.connection.log_info(
                f"Relations of degree {degrees[-1]} lie above the sweep; they do not constrain it.")

    def run_all(self) -> None:
        self.check_characteristic()
        self.check_cover()
        self.check_families()
        self.check_nc_order()
        self.report_relation_degrees()
