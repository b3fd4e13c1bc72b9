from django.db import models


class ScanCheckpoint(models.Model):
    """
    A named, resumable family scan. One checkpoint belongs to one (family, bound)
    pair; rerunning with the same name and a different family is refused.
    """
    name = models.CharField(max_length=200, unique=True)
    family = models.CharField(max_length=100, db_index=True)
    bound = models.IntegerField()
    created = models.DateTimeField(auto_now_add=True)
    updated = models.DateTimeField(auto_now=True)

    class Meta:
        constraints = [
            models.CheckConstraint(check=models.Q(bound__gte=1), name='checkpoint_bound_positive'),
        ]

    def __str__(self):
        return f"{self.name} ({self.family}, bound {self.bound})"


class InstanceResult(models.Model):
    checkpoint = models.ForeignKey(ScanCheckpoint, related_name='results', on_delete=models.CASCADE)
    key = models.CharField(max_length=500)  # json of the family parameters
    terms = models.IntegerField()
    passing = models.IntegerField()
    seconds = models.FloatField(default=0)
    data = models.JSONField()

    class Meta:
        constraints = [
            models.UniqueConstraint(fields=['checkpoint', 'key'], name='one_result_per_instance'),
            models.CheckConstraint(check=models.Q(passing__lte=models.F('terms')), name='passing_within_terms'),
        ]

    def __str__(self):
        return f"{self.checkpoint.name} {self.key}: {self.passing}/{self.terms}"
