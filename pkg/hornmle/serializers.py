from rest_framework import serializers

from .disctriple import MarkedPoly, ModelRecord, ToricMatrix
from .exactalg import SparsePoly, as_rational, format_rational
from .exceptions import InputError
from .families import params_to_json
from .horn import HornMatrix, HornPair, PairStatus
from .models import InstanceResult
from .stagedtree import ContingencyTable, DAGModel, StagedTree


class RationalField(serializers.Field):
    """Integers, "p/q" and "p" strings in; "p/q" or "p" out."""
    default_error_messages = {'invalid': 'not a rational number: {value!r}'}

    def to_internal_value(self, data):
        try:
            return as_rational(data)
        except (TypeError, ValueError, ZeroDivisionError):
            self.fail('invalid', value=data)

    def to_representation(self, value):
        return format_rational(value)


class PolynomialTermSerializer(serializers.Serializer):
    c = RationalField()
    e = serializers.ListField(child=serializers.IntegerField())


class PolynomialSerializer(serializers.Serializer):
    vars = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    terms = PolynomialTermSerializer(many=True)

    def validate(self, attrs):
        nvars = len(attrs['vars'])
        for k, term in enumerate(attrs['terms']):
            if len(term['e']) != nvars:
                raise serializers.ValidationError({'terms': f"term {k} has {len(term['e'])} exponents for {nvars} variables"})
        return attrs

    def create(self, validated_data) -> SparsePoly:
        nvars = len(validated_data['vars'])
        poly = SparsePoly.zero(nvars)
        for term in validated_data['terms']:
            poly = poly + SparsePoly.monomial(nvars, term['e'], term['c'])
        return poly


class HornPairSerializer(serializers.Serializer):
    H = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()), allow_empty=False)
    row_labels = serializers.ListField(child=serializers.CharField(), required=False)
    lam = serializers.ListField(child=RationalField(), source='lam', allow_empty=False)
    status = serializers.ChoiceField(choices=[s.value for s in PairStatus], required=False)

    def get_fields(self):
        # lambda is a keyword, so the field is declared as lam and renamed here
        fields = super().get_fields()
        fields['lambda'] = fields.pop('lam')
        return fields

    def validate(self, attrs):
        try:
            H = HornMatrix(attrs['H'], attrs.get('row_labels'))
        except InputError as e:
            raise serializers.ValidationError({'H': str(e)})
        try:
            attrs['pair'] = HornPair(H, attrs['lam'], PairStatus(attrs.get('status', 'unverified')))
        except InputError as e:
            raise serializers.ValidationError({'lambda': str(e)})
        return attrs

    def create(self, validated_data) -> HornPair:
        return validated_data['pair']


class ModelRecordSerializer(HornPairSerializer):
    sigma = serializers.ListField(child=serializers.IntegerField(min_value=-1, max_value=1))
    term_index = serializers.IntegerField(min_value=0)
    marked_term = serializers.CharField()
    provenance = serializers.DictField(required=False)

    def create(self, validated_data) -> ModelRecord:
        return ModelRecord(validated_data['pair'], tuple(validated_data['sigma']), validated_data['term_index'],
                           validated_data['marked_term'], dict(validated_data.get('provenance', {})))


class EdgeSerializer(serializers.Serializer):
    source = serializers.CharField()
    to = serializers.CharField()
    label = serializers.CharField()

    def get_fields(self):
        fields = super().get_fields()
        fields['from'] = fields.pop('source')
        return fields


class TreeSerializer(serializers.Serializer):
    edges = EdgeSerializer(many=True, allow_empty=False)
    nodes = serializers.ListField(child=serializers.CharField(), required=False)

    def validate(self, attrs):
        try:
            tree = StagedTree([(e['from'], e['to'], e['label']) for e in attrs['edges']], attrs.get('nodes'))
        except InputError as e:
            raise serializers.ValidationError({'edges': str(e)})
        violations = tree.validate()
        if violations:
            raise serializers.ValidationError({'edges': violations})
        attrs['tree'] = tree
        return attrs

    def create(self, validated_data) -> StagedTree:
        return validated_data['tree']


class ContingencyTableSerializer(serializers.Serializer):
    dims = serializers.ListField(child=serializers.IntegerField(min_value=1))
    counts = serializers.ListField(child=RationalField())

    def validate(self, attrs):
        try:
            attrs['table'] = ContingencyTable(attrs['dims'], attrs['counts'])
        except InputError as e:
            raise serializers.ValidationError({'counts': str(e)})
        return attrs

    def create(self, validated_data) -> ContingencyTable:
        return validated_data['table']


class DAGSerializer(serializers.Serializer):
    states = serializers.ListField(child=serializers.IntegerField(min_value=2), allow_empty=False)
    edges = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField(min_value=1),
                                                              min_length=2, max_length=2), required=False)

    def validate(self, attrs):
        try:
            attrs['dag'] = DAGModel.from_edges(attrs['states'], [tuple(e) for e in attrs.get('edges', [])])
        except InputError as e:
            raise serializers.ValidationError({'edges': str(e)})
        return attrs

    def create(self, validated_data) -> DAGModel:
        return validated_data['dag']


class TripleSerializer(serializers.Serializer):
    """A, Delta and the marked term given by its index in canonical order or by its exponents."""
    A = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()), allow_empty=False)
    delta = PolynomialSerializer()
    marked_term_index = serializers.IntegerField(min_value=0, required=False)
    marked_exponents = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)

    def validate(self, attrs):
        try:
            attrs['A_matrix'] = ToricMatrix(attrs['A'])
        except InputError as e:
            raise serializers.ValidationError({'A': str(e)})
        delta_data = attrs['delta']
        delta = PolynomialSerializer().create(delta_data)
        if delta.nvars != attrs['A_matrix'].m:
            raise serializers.ValidationError({'delta': f"{delta.nvars} variables, A has {attrs['A_matrix'].m} columns"})
        try:
            if 'marked_exponents' in attrs:
                exponents = tuple(attrs['marked_exponents'])
                coefficient = delta.coefficient(exponents) if len(exponents) == delta.nvars else 0
                marked = MarkedPoly(delta, exponents, coefficient, delta_data['vars'])
            else:
                marked = MarkedPoly.from_index(delta, attrs.get('marked_term_index', 0), delta_data['vars'])
        except InputError as e:
            raise serializers.ValidationError({'marked_term_index': str(e)})
        attrs['marked'] = marked
        return attrs

    def create(self, validated_data):
        return validated_data['A_matrix'], validated_data['marked']


class CheckSerializer(serializers.Serializer):
    name = serializers.CharField()
    trials = serializers.IntegerField()
    passed = serializers.IntegerField()
    ok = serializers.BooleanField()


class VerificationReportSerializer(serializers.Serializer):
    checks = CheckSerializer(many=True)
    seed = serializers.IntegerField()
    failures = serializers.ListField(child=serializers.CharField())


class ScanInstanceSerializer(serializers.Serializer):
    params = serializers.SerializerMethodField()
    terms = serializers.IntegerField(source='n_terms')
    passing = serializers.ListField(child=serializers.IntegerField())
    degree = serializers.IntegerField(allow_null=True)

    def get_params(self, record):
        return params_to_json(record.params)


class InstanceResultSerializer(serializers.ModelSerializer):
    class Meta:
        model = InstanceResult
        fields = ['id', 'checkpoint', 'key', 'terms', 'passing', 'seconds', 'data']
        read_only_fields = ['checkpoint']

    def validate(self, attrs):
        if attrs['passing'] > attrs['terms']:
            raise serializers.ValidationError({'passing': "more passing terms than terms"})
        return attrs
