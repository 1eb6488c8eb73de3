# Experiment configuration documents.
from rest_framework import serializers

U64_MAX = 2 ** 64 - 1


class ExperimentConfigSerializer(serializers.Serializer):
	'''
		Validates the configuration of one lab run. Unknown top-level keys are
		rejected, and so are parameter keys the subcommand does not declare
		(pass them as `allowed_params` in the serializer context).
	'''
	command = serializers.CharField()
	inputs = serializers.ListField(child=serializers.CharField(), default=list)
	params = serializers.DictField(default=dict)
	seed = serializers.IntegerField(min_value=0, max_value=U64_MAX, default=0)
	output_dir = serializers.CharField()

	def validate(self, attrs):
		unknown = set(self.initial_data) - set(self.fields)
		if unknown:
			raise serializers.ValidationError({key: "Unknown key." for key in sorted(unknown)})
		allowed = self.context.get('allowed_params')
		if allowed is not None:
			unexpected = set(attrs['params']) - set(allowed)
			if unexpected:
				raise serializers.ValidationError(
					{'params': [f"Unknown parameter '{key}'." for key in sorted(unexpected)]}
				)
		return attrs

	def hashed_view(self):
		'''The part of the config that determines the outputs.'''
		data = self.validated_data
		return {
			'command': data['command'],
			'inputs': list(data['inputs']),
			'params': dict(data['params']),
			'seed': data['seed'],
		}
