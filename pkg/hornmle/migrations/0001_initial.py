from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ScanCheckpoint',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=200, unique=True)),
                ('family', models.CharField(db_index=True, max_length=100)),
                ('bound', models.IntegerField()),
                ('created', models.DateTimeField(auto_now_add=True)),
                ('updated', models.DateTimeField(auto_now=True)),
            ],
        ),
        migrations.CreateModel(
            name='InstanceResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('key', models.CharField(max_length=500)),
                ('terms', models.IntegerField()),
                ('passing', models.IntegerField()),
                ('seconds', models.FloatField(default=0)),
                ('data', models.JSONField()),
                ('checkpoint', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='results', to='hornmle.scancheckpoint')),
            ],
        ),
        migrations.AddConstraint(
            model_name='scancheckpoint',
            constraint=models.CheckConstraint(check=models.Q(('bound__gte', 1)), name='checkpoint_bound_positive'),
        ),
        migrations.AddConstraint(
            model_name='instanceresult',
            constraint=models.UniqueConstraint(fields=('checkpoint', 'key'), name='one_result_per_instance'),
        ),
        migrations.AddConstraint(
            model_name='instanceresult',
            constraint=models.CheckConstraint(check=models.Q(('passing__lte', models.F('terms'))), name='passing_within_terms'),
        ),
    ]
