#include <tee_internal_api.h>
#include <stdio.h>

static TEE_Result show(uint32_t param_types, TEE_Param params[4])
{
	char arg0[16] = "alice";
	char arg1[16] = "s3cr3t";

	(void)param_types;
	snprintf(params[0].memref.buffer, params[0].memref.size, "%s %s", arg0, arg1);
	return TEE_SUCCESS;
}
